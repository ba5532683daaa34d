#pragma once

#include <string>
#include <vector>

namespace da {

struct PropcheckResult {
  bool gradient_identity_ok = false;   // CE logit-gradient L1 = 2(1 - p_y), rank corr 1.0
  bool entropy_kl_ok = false;          // brute-force E[KL] vs entropy, Spearman >= 0.9
  bool finite_difference_ok = false;   // analytic grads vs central differences
  double gradient_identity_max_err = 0.0;
  double gradient_identity_rank_corr = 0.0;
  double entropy_kl_spearman = 0.0;
  double finite_difference_max_rel_err = 0.0;
  std::string detail;

  bool all_ok() const { return gradient_identity_ok && entropy_kl_ok && finite_difference_ok; }
};

PropcheckResult run_propcheck();

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace da
