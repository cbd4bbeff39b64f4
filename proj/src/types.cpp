#include "persuade/types.hpp"

namespace persuade {

std::string to_string(InterimRegion r) {
  switch (r) {
    case InterimRegion::InF:
      return "InF";
    case InterimRegion::InDNotF:
      return "InDNotF";
    case InterimRegion::InMNotD:
      return "InMNotD";
    case InterimRegion::OutsideM:
      return "OutsideM";
  }
  return "unknown";
}

std::string to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::NoDisclosureNeeded:
      return "NoDisclosureNeeded";
    case RegimeLabel::PreemptiveWarning:
      return "PreemptiveWarning";
    case RegimeLabel::CommittedComfort:
      return "CommittedComfort";
    case RegimeLabel::PreemptiveComfort:
      return "PreemptiveComfort";
    case RegimeLabel::UnableToPersuade:
      return "UnableToPersuade";
  }
  return "unknown";
}

}  // namespace persuade
