#pragma once

#include "mildns/field.hpp"

namespace mildns {

// All integrals are grid means: the torus has unit volume.

/// (mean |f|^p)^{1/p}; vector fields use the pointwise Euclidean magnitude.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& u, double p);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& u);
double sup_norm(const ScalarField& f);
double sup_norm(const VectorField& u);

/// |f|_p + |grad f|_p + |Hessian f|_p with Frobenius magnitudes.
double w2p_norm(const ScalarField& f, double p);
double w2p_norm(const VectorField& u, double p);

/// sum_k (1 + lambda_k)^s |f_k|^2, normalized so that s = 0 gives ||f||_2^2.
double hs_norm_sq(const ScalarField& f, double s);
double hs_norm_sq(const VectorField& u, double s);

/// ||grad^k f||_2 evaluated spectrally as (sum lambda^k |f_k|^2)^{1/2}.
double gradient_power_norm(const ScalarField& f, int k);
double gradient_power_norm(const VectorField& u, int k);

double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& u, const VectorField& w);

/// (mean weight |u|^2)^{1/2}.
double weighted_l2_norm(const ScalarField& f, const ScalarField& weight);
double weighted_l2_norm(const VectorField& u, const ScalarField& weight);

/// Pointwise Frobenius magnitude of the Jacobian of u.
ScalarField gradient_magnitude(const VectorField& u);
ScalarField gradient_magnitude(const ScalarField& f);
/// Pointwise Frobenius magnitude of all second derivatives.
ScalarField hessian_magnitude(const ScalarField& f);
ScalarField hessian_magnitude(const VectorField& u);
/// Pointwise Euclidean magnitude.
ScalarField magnitude(const VectorField& u);

}  // namespace mildns
