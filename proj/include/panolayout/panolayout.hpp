#pragma once

// Umbrella header.

#include "panolayout/error.hpp"
#include "panolayout/panorama.hpp"
#include "panolayout/signal.hpp"
#include "panolayout/geometry.hpp"
#include "panolayout/detect.hpp"
#include "panolayout/loss.hpp"
#include "panolayout/synth.hpp"
#include "panolayout/metrics.hpp"
#include "panolayout/io.hpp"
