#pragma once

#include <optional>
#include <string>

#include "persuade/lottery.hpp"

namespace persuade {

// Where an interim belief sits relative to the motivation sets.
//   InF      the doctor's unconstrained choice already motivates the test
//   InDNotF  a perfect-good-news signal with a binding constraint
//   InMNotD  a perfect-bad-news signal with a binding constraint
//   OutsideM no signal motivates the test
enum class InterimRegion { InF, InDNotF, InMNotD, OutsideM };

enum class RegimeLabel {
  NoDisclosureNeeded,
  PreemptiveWarning,
  CommittedComfort,
  PreemptiveComfort,
  UnableToPersuade,
};

struct Regime {
  RegimeLabel label = RegimeLabel::NoDisclosureNeeded;
  InterimRegion region = InterimRegion::InF;
};

// Critical beliefs; a disengaged optional means the defining set is empty.
struct Thresholds {
  double mu_e = 0.0;
  std::optional<double> mu_v;
  std::optional<double> mu_F;
  std::optional<double> mu_D;
  std::optional<double> mu_M_low;
  std::optional<double> mu_M_high;
  std::optional<double> mu_N;
  std::optional<double> mu_T;
  std::optional<double> mu_V;
  bool reacts_to_fear = false;
  bool mu_v_degenerate = false;
};

struct InterimSolution {
  Belief prior = 0.0;
  PosteriorLottery accept_signal = PosteriorLottery::point(0.0);
  PosteriorLottery reject_signal = PosteriorLottery::point(0.0);
  InterimRegion region = InterimRegion::OutsideM;
  bool tests = false;
  double doctor_value = 0.0;   // health probability
  double patient_value = 0.0;  // the better of testing and skipping
  double pc_slack = 0.0;       // value of testing minus value of skipping
};

std::string to_string(InterimRegion r);
std::string to_string(RegimeLabel r);

}  // namespace persuade
