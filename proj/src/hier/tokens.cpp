#include "trajlab/hier/tokens.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab::hier {

const ActionTokenInfo& TokenCatalog::action_info(int token) const {
  if (!is_action_token(token)) {
    throw DegenerateInputError("TokenCatalog: not an action token");
  }
  return actions[static_cast<std::size_t>(token - action_token_begin)];
}

std::vector<int> TokenCatalog::grounding_alternatives(int token) const {
  std::vector<int> alts;
  if (!is_action_token(token)) return alts;
  const ActionTokenInfo& info = action_info(token);
  if (info.object < 0) return alts;
  for (const ActionTokenInfo& other : actions) {
    if (other.verb == info.verb && other.category == info.category &&
        other.object != info.object) {
      alts.push_back(other.token);
    }
  }
  return alts;
}

}  // namespace trajlab::hier
