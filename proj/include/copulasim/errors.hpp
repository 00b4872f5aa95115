#ifndef COPULASIM_ERRORS_HPP
#define COPULASIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace copulasim {

// Input tables contradict each other (negative derived counts, asymmetric
// pair table, marginals that do not add up). Maps to CLI exit code 3.
class inconsistent_tables_error : public std::runtime_error {
  public:
    explicit inconsistent_tables_error(const std::string& what)
        : std::runtime_error(what) {}
};

// No integer deal assignment exists for the requested count targets.
class infeasible_population_error : public std::runtime_error {
  public:
    explicit infeasible_population_error(const std::string& what)
        : std::runtime_error(what) {}
};

// alpha0^2 + e'Sigma e >= 1 for some attribute vector, so the idiosyncratic
// variance would be nonpositive. Maps to CLI exit code 4.
class infeasible_variance_error : public std::runtime_error {
  public:
    explicit infeasible_variance_error(const std::string& what)
        : std::runtime_error(what) {}
};

class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

}  // namespace copulasim

#endif
