#pragma once

#include <string>

#include "influx/network.hpp"

namespace influx::testing {

inline std::string data_path(const std::string& file) { return std::string(INFLUX_DATA_DIR) + "/" + file; }

inline ReactionNetwork fixture(const std::string& file) { return load_network(data_path(file)); }

}  // namespace influx::testing
