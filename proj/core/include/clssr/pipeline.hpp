#pragma once

#include <vector>

#include "clssr/channel.hpp"
#include "clssr/metrics.hpp"
#include "clssr/semantics.hpp"

namespace clssr {

// One simultaneous fading realization of the user link and every
// eavesdropper link.
struct LinkDraw {
  ChannelMatrix user;
  std::vector<ChannelMatrix> eves;
};

// Draws the user channel first, then each eavesdropper in listed order, all
// from the given stream; the order is part of the determinism contract.
LinkDraw sample_links(Philox4x32& rng, const LinkBudget& budget,
                      const NodeGeometry& geometry, const AntennaMode& mode);

// How a scheme is allowed to claim security. The physical-layer-only
// baseline clears app_layer_security and transmits without semantic noise.
struct SchemeRules {
  bool app_layer_security = true;
};

// Full cross-layer evaluation of one channel draw under one action
// (beamformer + bit depth): rates and secrecy rates per link, decode error
// through the diversity combiner, semantic distortions, task security,
// bit efficiency, secure rate and timeliness.
SecuritySnapshot evaluate_snapshot(const LinkDraw& draw, const Beamformer& f,
                                   int bits, const SemanticConfig& semantic,
                                   const LinkBudget& budget,
                                   const AntennaMode& mode, double t_max_s,
                                   const SchemeRules& rules = {});

}  // namespace clssr
