#include "apery/errors.hpp"

namespace apery {

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::quadrature: return "quadrature";
    case Stage::no_recurrence: return "no-recurrence";
    case Stage::no_initial_relation: return "no-initial-relation";
    case Stage::degenerate_asymptotics: return "degenerate-asymptotics";
    case Stage::conjecture_failure: return "conjecture-failure";
    case Stage::identification: return "identification";
  }
  return "unknown";
}

}  // namespace apery
