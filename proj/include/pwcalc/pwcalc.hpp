#pragma once

#include "errors.hpp"
#include "lebesgue.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "means_entropy.hpp"
#include "pw_function.hpp"
#include "pw_rep.hpp"
#include "radon_nikodym.hpp"
#include "tolerance.hpp"
