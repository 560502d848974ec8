// precs.hpp — umbrella header
#pragma once

#include "precs/commands.hpp"
#include "precs/config.hpp"
#include "precs/csv.hpp"
#include "precs/dynamics.hpp"
#include "precs/errors.hpp"
#include "precs/field.hpp"
#include "precs/fock.hpp"
#include "precs/model.hpp"
