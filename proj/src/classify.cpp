#include <algorithm>
#include <cmath>
#include <limits>

#include "wobblelab/potential.hpp"

namespace wobblelab {

std::string to_string(Recurrence r) {
  switch (r) {
    case Recurrence::recurrent:
      return "recurrent";
    case Recurrence::transient:
      return "transient";
    case Recurrence::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(DecayModel m) {
  switch (m) {
    case DecayModel::limit:
      return "limit";
    case DecayModel::logarithmic:
      return "logarithmic";
    case DecayModel::power:
      return "power";
  }
  return "limit";
}

double ModelFit::predict(double n) const {
  switch (model) {
    case DecayModel::limit:
      return first + second / n;
    case DecayModel::logarithmic: {
      const double denom = first * std::log(n) + second;
      return denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    }
    case DecayModel::power:
      return first * std::pow(n, -second);
  }
  return 0.0;
}

namespace {

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {my - slope * mx, slope};
}

double relative_rss(const ModelFit& fit, std::span<const std::int64_t> radii, std::span<const double> caps) {
  double rss = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double p = fit.predict(static_cast<double>(radii[i]));
    const double scale = caps[i] > 0.0 ? caps[i] : 1.0;
    const double r = (p - caps[i]) / scale;
    rss += r * r;
  }
  return std::isfinite(rss) ? rss : std::numeric_limits<double>::infinity();
}

}  // namespace

Classification classify_capacities(std::span<const std::int64_t> radii, std::span<const double> caps,
                                   double solver_tolerance) {
  if (radii.size() != caps.size()) throw Error("classify_capacities: radii and values differ in length");
  Classification out;
  if (radii.size() < 3) {
    out.note = "classification needs at least 3 radii";
    return out;
  }
  const double floor = 10.0 * solver_tolerance;
  if (caps.back() <= floor) {
    out.label = Recurrence::recurrent;
    out.note = "capacity vanishes at the largest radius";
    return out;
  }
  const bool positive = std::all_of(caps.begin(), caps.end(), [](double c) { return c > 0.0; });

  std::vector<double> inv_n, log_n, inv_cap, log_cap;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto n = static_cast<double>(radii[i]);
    inv_n.push_back(1.0 / n);
    log_n.push_back(std::log(n));
    inv_cap.push_back(positive ? 1.0 / caps[i] : 0.0);
    log_cap.push_back(positive ? std::log(caps[i]) : 0.0);
  }

  {
    const Line l = least_squares(inv_n, caps);
    ModelFit fit{DecayModel::limit, l.intercept, l.slope, 0.0, l.intercept > floor};
    fit.rss = relative_rss(fit, radii, caps);
    out.fits.push_back(fit);
  }
  {
    const Line l = least_squares(log_n, inv_cap);
    ModelFit fit{DecayModel::logarithmic, l.slope, l.intercept, 0.0, positive && l.slope > 0.0};
    fit.rss = relative_rss(fit, radii, caps);
    out.fits.push_back(fit);
  }
  {
    const Line l = least_squares(log_n, log_cap);
    ModelFit fit{DecayModel::power, std::exp(l.intercept), -l.slope, 0.0, positive && -l.slope > 0.0};
    fit.rss = relative_rss(fit, radii, caps);
    out.fits.push_back(fit);
  }

  const ModelFit* best = nullptr;
  for (const auto& fit : out.fits) {
    if (fit.eligible && (best == nullptr || fit.rss < best->rss)) best = &fit;
  }
  if (best == nullptr) {
    out.note = "no model fits with admissible parameters";
    return out;
  }
  out.preferred = best->model;
  if (best->model == DecayModel::limit) {
    out.label = Recurrence::transient;
    out.extrapolated_limit = best->first;
  } else if (caps.back() < 0.5 * caps.front()) {
    out.label = Recurrence::recurrent;
  } else {
    out.note = "decaying model preferred but capacity has not halved across the radii";
  }
  return out;
}

}  // namespace wobblelab
