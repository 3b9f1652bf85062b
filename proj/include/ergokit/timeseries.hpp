#pragma once

#include <map>
#include <string>
#include <vector>

namespace ergokit {

/// Paired (time, value) samples with metadata identifying the quantity and
/// the parameters it was computed for.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string quantity;
    std::map<std::string, std::string> meta;
};

}  // namespace ergokit
