#ifndef EOPTD_EOPTD_HPP
#define EOPTD_EOPTD_HPP

#include "eoptd/numeric.hpp"
#include "eoptd/matrix.hpp"
#include "eoptd/model.hpp"
#include "eoptd/design.hpp"
#include "eoptd/spectrum.hpp"
#include "eoptd/cube.hpp"
#include "eoptd/ball.hpp"
#include "eoptd/certify.hpp"
#include "eoptd/io.hpp"

#endif  // EOPTD_EOPTD_HPP
