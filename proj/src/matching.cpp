#include "veinforge/matching.hpp"

#include <cmath>
#include <limits>

#include "veinforge/common.hpp"

namespace vf {

double euclidean(const WeightVector& a, const WeightVector& b) {
  if (a.size() != b.size()) raise(Err::DimensionMismatch, "weight lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {

MatchDecision gated_match(const VeinSpaceModel& model, const PairGrid& probe,
                          const std::string* claimed, OpCounters* counters) {
  if (model.templates.empty()) raise(Err::EmptyModel, "no enrolled templates");
  if (claimed) {
    bool known = false;
    for (const auto& t : model.templates) known = known || t.label == *claimed;
    if (!known) raise(Err::UnknownLabel, "claimed label not enrolled");
  }

  MatchDecision dec;
  dec.vein_score = residual(probe, model.mean, model.eigenveins);
  if (dec.vein_score > model.theta_vein) {
    dec.outcome = Outcome::RejectedNotAVein;
    dec.distance = std::numeric_limits<double>::infinity();
    return dec;
  }

  const WeightVector w = project(probe, model.mean, model.eigenveins);
  if (counters)
    counters->reals_touched += static_cast<std::uint64_t>(probe.M) * 2 * probe.N;

  double best = std::numeric_limits<double>::infinity();
  const std::string* best_label = nullptr;
  for (const auto& t : model.templates) {
    if (claimed && t.label != *claimed) continue;
    const double d = euclidean(w, t.weights);
    if (counters) counters->reals_touched += t.weights.size();
    if (d < best) {
      best = d;
      best_label = &t.label;
    }
  }

  dec.distance = best;
  dec.best_label = *best_label;
  dec.outcome =
      best <= model.theta_id ? Outcome::Accepted : Outcome::RejectedUnknown;
  return dec;
}

}  // namespace

MatchDecision identify(const VeinSpaceModel& model, const PairGrid& probe,
                       OpCounters* counters) {
  return gated_match(model, probe, nullptr, counters);
}

MatchDecision verify(const VeinSpaceModel& model, const PairGrid& probe,
                     const std::string& claimed, OpCounters* counters) {
  return gated_match(model, probe, &claimed, counters);
}

double pixel_similarity(const BinaryImage& a, const BinaryImage& b,
                        PixelNorm norm) {
  if (a.width != b.width || a.height != b.height)
    raise(Err::DimensionMismatch, "image dimensions");
  std::uint64_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    na += a.pixels[i] != 0;
    nb += b.pixels[i] != 0;
    both += a.pixels[i] != 0 && b.pixels[i] != 0;
  }
  if (na == 0 && nb == 0) raise(Err::BothEmpty, "both skeletons empty");
  const std::uint64_t denom =
      norm == PixelNorm::Max ? std::max(na, nb) : na + nb - both;
  return static_cast<double>(both) / static_cast<double>(denom);
}

MatchDecision pixel_identify(
    const std::vector<std::pair<std::string, BinaryImage>>& templates,
    const BinaryImage& probe, double theta_px, PixelNorm norm,
    OpCounters* counters) {
  if (templates.empty()) raise(Err::EmptyModel, "no enrolled templates");

  MatchDecision dec;
  double best = -1.0;
  for (const auto& [label, img] : templates) {
    const double sim = pixel_similarity(img, probe, norm);
    if (counters)
      counters->pixels_touched +=
          static_cast<std::uint64_t>(img.width) * img.height;
    if (sim > best) {
      best = sim;
      dec.best_label = label;
    }
  }
  dec.distance = 1.0 - best;
  dec.outcome = best >= theta_px ? Outcome::Accepted : Outcome::RejectedUnknown;
  return dec;
}

}  // namespace vf
