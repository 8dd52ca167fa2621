#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mmpo/policy.hpp"
#include "mmpo/task.hpp"

namespace mmpo {

// Bounded summary memory after turn `turn`.
struct MemoryState {
  std::vector<int> tokens;
  int turn = 0;
};

enum class AnchorVariant { kProgressGap, kGapOnly, kDirectAnswer };

std::string anchor_variant_name(AnchorVariant v);
AnchorVariant anchor_variant_from_name(const std::string& name);

// Fixed probe whose response uncertainty is measured each turn.  The marker
// token is injected into the observation slot of the probe context; the
// dual probe (progress + gap) uses a longer response window than the
// gap-only probe, and the direct-answer probe decodes in the answer role.
struct AnchorQuestion {
  AnchorVariant variant = AnchorVariant::kProgressGap;
  int marker_token = Vocabulary::kAnchorProgressGap;
  Role role = Role::kAnchorResponse;
  int response_len = 4;

  static AnchorQuestion make(AnchorVariant variant, const TaskConfig& config) {
    AnchorQuestion q;
    q.variant = variant;
    switch (variant) {
      case AnchorVariant::kProgressGap:
        q.marker_token = Vocabulary::kAnchorProgressGap;
        q.role = Role::kAnchorResponse;
        q.response_len = config.anchor_max_len;
        break;
      case AnchorVariant::kGapOnly:
        q.marker_token = Vocabulary::kAnchorGapOnly;
        q.role = Role::kAnchorResponse;
        q.response_len = std::max(1, config.anchor_max_len / 2);
        break;
      case AnchorVariant::kDirectAnswer:
        q.marker_token = Vocabulary::kAnswerPrompt;
        q.role = Role::kAnswer;
        q.response_len = std::min(config.num_facts, config.anchor_max_len);
        break;
    }
    return q;
  }
};

}  // namespace mmpo
