#include "gapflow/martingale.hpp"

#include "gapflow/errors.hpp"

namespace gapflow {

namespace {

bool support_is_single_point(const SpeedMeasure& nu, double x0) {
  return nu.purely_atomic() && nu.atoms.size() == 1 && nu.atoms.front().position == x0;
}

std::pair<bool, std::vector<std::string>> classify_local_impl(const SpeedMeasure& nu, double x0) {
  std::vector<std::string> reasons;
  if (nu.atoms.empty() && nu.purely_atomic()) {
    reasons.push_back("support is empty: no gap diffusion is defined");
    return {false, reasons};
  }
  if (support_is_single_point(nu, x0)) {
    reasons.push_back("supp = {x0}: the process is the constant x0");
    return {true, reasons};
  }

  const SupportClassification cls = classify_support(nu, x0);
  const bool left_inf_set = cls.xinf_minus > -kInf;
  const bool right_inf_set = cls.xinf_plus < kInf;
  const bool left_unbounded = nu.left_tail_diverges;
  const bool right_unbounded = nu.right_tail_diverges;

  const bool left_ok = left_inf_set || left_unbounded;
  const bool right_ok = right_inf_set || right_unbounded;
  if (left_inf_set) {
    reasons.push_back("left clause holds: infinity-set point at or below x0");
  } else if (left_unbounded) {
    reasons.push_back("left clause holds: support unbounded below (declared tail)");
  } else {
    reasons.push_back("left clause fails: support bounded below with no infinity-set point");
  }
  if (right_inf_set) {
    reasons.push_back("right clause holds: infinity-set point at or above x0");
  } else if (right_unbounded) {
    reasons.push_back("right clause holds: support unbounded above (declared tail)");
  } else {
    reasons.push_back("right clause fails: support bounded above with no infinity-set point");
  }
  return {left_ok && right_ok, reasons};
}

}  // namespace

std::pair<bool, std::vector<std::string>> classify_local(const SpeedMeasure& nu, double x0) {
  return classify_local_impl(nu, x0);
}

MartingaleVerdict classify_true(const SpeedMeasure& nu, double x0,
                                std::optional<TailMoment> left_tail,
                                std::optional<TailMoment> right_tail) {
  if (left_tail.has_value() != right_tail.has_value()) {
    throw Error(ErrorCode::MissingDeclaration,
                "tail moment declarations must cover both sides");
  }

  MartingaleVerdict verdict;

  // An override declaring an infinite tail moment implies unbounded support
  // on that side, so the local test sees it as a divergence flag.
  SpeedMeasure effective = nu;
  if (left_tail && *left_tail == TailMoment::infinite) effective.left_tail_diverges = true;
  if (right_tail && *right_tail == TailMoment::infinite) effective.right_tail_diverges = true;

  auto [local, local_reasons] = classify_local_impl(effective, x0);
  verdict.local_martingale = local;
  verdict.reasons = std::move(local_reasons);
  if (!local) {
    verdict.true_martingale = false;
    verdict.reasons.push_back("not a local martingale, hence not a martingale");
    return verdict;
  }

  if (support_is_single_point(nu, x0)) {
    verdict.true_martingale = true;
    verdict.reasons.push_back("martingale: supp = {x0}");
    return verdict;
  }
  const SupportClassification cls = classify_support(nu, x0);
  if (cls.x0_in_suppinf) {
    verdict.true_martingale = true;
    verdict.reasons.push_back("martingale: x0 lies in the infinity set");
    return verdict;
  }

  // Tail integrals of (1+|x|) against nu. Finitely many finite atoms always
  // integrate finitely, so a side diverges only through an infinite atom or
  // the continuous-part declaration.
  const bool left_atom_inf = cls.xinf_minus > -kInf;
  const bool right_atom_inf = cls.xinf_plus < kInf;
  const bool left_cont_inf = left_tail ? *left_tail == TailMoment::infinite
                                       : nu.left_tail_diverges;
  const bool right_cont_inf = right_tail ? *right_tail == TailMoment::infinite
                                         : nu.right_tail_diverges;
  const bool left_div = left_atom_inf || left_cont_inf;
  const bool right_div = right_atom_inf || right_cont_inf;

  verdict.reasons.push_back(left_div ? "left (1+|x|) tail integral diverges"
                                     : "left (1+|x|) tail integral is finite");
  verdict.reasons.push_back(right_div ? "right (1+|x|) tail integral diverges"
                                      : "right (1+|x|) tail integral is finite");
  verdict.true_martingale = left_div && right_div;
  verdict.reasons.push_back(verdict.true_martingale
                                ? "martingale: both tail integrals diverge"
                                : "strict local martingale: a tail integral is finite");
  return verdict;
}

}  // namespace gapflow
