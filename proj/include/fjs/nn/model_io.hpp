#pragma once

#include <string>

#include "fjs/nn/hgat.hpp"

namespace fjs::nn {

// Binary model file: magic "FJNM", version, dims, a hash of the feature
// scaling scheme the weights were trained against, then the flat parameter
// vector with an integrity checksum. load_model refuses files whose scaling
// scheme differs from the one this build produces.
void save_model(const std::string& path, const HgatParams& params);
HgatParams load_model(const std::string& path);

}  // namespace fjs::nn
