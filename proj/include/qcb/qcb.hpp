#pragma once

#include "qcb/core.hpp"
#include "qcb/parallel.hpp"
#include "qcb/quad.hpp"
#include "qcb/modulus.hpp"
#include "qcb/bounds.hpp"
#include "qcb/gallery.hpp"
#include "qcb/certify.hpp"
#include "qcb/sampled.hpp"
#include "qcb/report.hpp"
#include "qcb/scenario.hpp"
