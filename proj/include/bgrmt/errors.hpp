#pragma once

#include <stdexcept>
#include <string>

namespace bgrmt {

// Two or more eigenvalues coincide; the Coulomb energy diverges.
struct degenerate_configuration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A closed-form branch was requested outside its domain of validity.
struct out_of_branch : std::domain_error {
  using std::domain_error::domain_error;
};

// A constructed density is negative somewhere or fails normalization.
struct non_admissible_density : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation point too close to the support of a density.
struct near_singularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Moment extraction requested on a support whose consistency residuals
// do not vanish.
struct residual_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A branch could not be started at the requested coupling.
struct seed_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A bracketing search found no sign change.
struct no_sign_change : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bgrmt
