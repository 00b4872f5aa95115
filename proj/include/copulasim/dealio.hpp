#ifndef COPULASIM_DEALIO_HPP
#define COPULASIM_DEALIO_HPP

#include <string>
#include <vector>

#include "copulasim/attributes.hpp"

namespace copulasim {

// Deal file format (UTF-8, '.' decimal separator), one deal per row:
//   id,founder,geo,markets,p,outcome
// markets is semicolon-joined (empty allowed); p is written with 17
// significant digits so the round trip is lossless; outcome is empty, 0 or 1.

void save_deals(const std::vector<Deal>& deals, const std::string& path);

/// Throws parse_error with the offending line number on malformed rows and
/// a validation error on duplicate ids.
std::vector<Deal> load_deals(const std::string& path);

}  // namespace copulasim

#endif
