#pragma once

#include <iosfwd>
#include <string>

#include "kcm/dgp.hpp"

namespace kcm::csv {

// Input schema: header row required; first column is the response y, the
// remaining columns are covariates. Missing or non-numeric cells are
// rejected with the offending (line, column).
dgp::Dataset read_dataset(std::istream& in, const std::string& name);
dgp::Dataset read_dataset_file(const std::string& path);

}  // namespace kcm::csv
