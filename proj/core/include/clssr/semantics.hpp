#pragma once

#include <vector>

namespace clssr {

struct Scenario;

// Application-layer coding parameters. A task message of n semantic symbols
// is quantized into a codeword of b bits; delta_z is the variance of the
// artificial semantic noise injected before transmission.
struct SemanticConfig {
  int n = 16;
  int b = 8;
  int b_min = 2;
  int b_max = 10;
  double delta_z = 0.0;
  double rho = 0.1;       // user-side sensitivity to semantic noise
  double kappa = 1.0;     // quantization distortion scale
  double epsilon = 0.01;  // task distortion threshold

  void validate() const;
  SemanticConfig with_bits(int bits) const;
};

// Expected task distortion at the legitimate user. The user shares the
// semantic key, so injected noise enters only through the residual term
// rho * delta_z; quantization contributes kappa * 2^-b and channel errors
// contribute the codeword error probability. Saturates at 1.
double distortion_user(double codeword_error, const SemanticConfig& cfg);

// Expected task distortion at an eavesdropper, who lacks the semantic key:
// correctly decoded codewords are still perturbed by the full injected
// noise, so delta_z multiplies the decode-success probability.
double distortion_eve(double codeword_error, const SemanticConfig& cfg);

// Grid-search calibration of delta_z, implemented in pipeline.cpp.
SemanticConfig pretrain_semantic(const std::vector<double>& grid,
                                 const Scenario& scenario);

}  // namespace clssr
