#pragma once

#include <string>
#include <vector>

#include "copostab/json_io.hpp"

namespace copostab {

// Bundled benchmark systems, in registry order.
std::vector<std::string> example_names();

// Throws UnknownExample for names outside the registry.
SystemDocument example_system(const std::string& name);

}  // namespace copostab
