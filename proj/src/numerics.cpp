#include "qzrp/numerics.hpp"

#include <cstdio>
#include <sstream>

namespace qzrp {

std::string ScalarTraits<double>::to_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double relative_gap(const Real& a, const Real& b, unsigned bits, const Real& scale) {
  const Real diff = abs(a - b);
  const Real floor = boost::multiprecision::pow(Real(2), -static_cast<int>(bits) + 8);
  if (diff <= floor) return 0.0;
  const Real reference = scale > 0 ? Real(abs(scale)) : std::max({Real(abs(a)), Real(abs(b)), floor});
  return (diff / reference).convert_to<double>();
}

std::pair<std::vector<NamedValue>, PrecisionReport> compute_verified(
    unsigned bits, double rel_tol, const std::function<std::vector<NamedValue>()>& compute) {
  std::vector<NamedValue> hi;
  {
    PrecisionScope scope(2 * bits);
    hi = compute();
  }
  PrecisionScope scope(bits);
  std::vector<NamedValue> lo = compute();
  if (lo.size() != hi.size()) throw PrecisionError("precision check: result shape changed with precision");

  PrecisionReport report{bits, 2 * bits, 0.0, ""};
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double gap = relative_gap(lo[i].value, hi[i].value, bits, hi[i].scale);
    if (gap > report.max_rel_diff) {
      report.max_rel_diff = gap;
      report.worst = lo[i].name;
    }
  }
  if (report.max_rel_diff > rel_tol) {
    std::ostringstream msg;
    msg << "precision check failed: '" << report.worst << "' differs by " << report.max_rel_diff
        << " (relative) between " << bits << " and " << 2 * bits << " bits; tolerance " << rel_tol;
    throw PrecisionError(msg.str());
  }
  return {std::move(lo), report};
}

}  // namespace qzrp
