#ifndef TALBOT_ERRORS_HPP
#define TALBOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace talbot {

/// Invalid configuration or physically inconsistent setup (e.g. a closed slit).
/// `what()` is a short field/cause key such as "open_fraction".
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Quadrature, root finding or truncation failed to reach its tolerance.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace talbot

#endif
