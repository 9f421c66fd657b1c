#pragma once

#include "thermoscan/imgproc/color.hpp"
#include "thermoscan/imgproc/distance.hpp"
#include "thermoscan/imgproc/filter.hpp"
#include "thermoscan/imgproc/histogram.hpp"
#include "thermoscan/imgproc/labeling.hpp"
#include "thermoscan/imgproc/morphology.hpp"
#include "thermoscan/imgproc/watershed.hpp"
