#pragma once

#include <string>

namespace wulffgrid {

// Fixed 9-decimal rendering used by every exporter; never prints "-0.000000000".
std::string fmt9(double x);

}  // namespace wulffgrid
