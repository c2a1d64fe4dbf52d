#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rbn/error.hpp"

namespace rbn {

/// The requested figure needs data the result directory does not hold.
class FigureCoverageError : public Error {
 public:
  using Error::Error;
};

/// Figure ids fig2 .. fig12 with a one-line description each.
std::vector<std::pair<std::string, std::string>> figure_catalog();

/// CSV series for a figure, computed from a result directory. The text starts
/// with "# " comment lines naming the figure and its columns. Throws
/// FigureCoverageError for unknown ids or results of the wrong kind.
std::string figure_data(const std::filesystem::path& results, const std::string& figure_id);

}  // namespace rbn
