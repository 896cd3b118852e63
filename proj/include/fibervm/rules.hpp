#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace fibervm {

/// Reduction rule names as they appear in traces and metrics.
enum class Rule : std::uint8_t {
  // Administrative (shared by C and OCaml).
  Var,
  Arith1,
  Arith2,
  Arith3,
  App1,
  App2,
  App3,
  Resume1,
  Resume2,
  Perform,
  Raise,
  // C.
  AdminC,
  CallC,
  Callback,
  RetToO,
  ExnFwdO,
  // OCaml.
  AdminO,
  CallO,
  ExtCall,
  RetToC,
  RetFib,
  Handle,
  ExnHn,
  ExnFwdC,
  ExnFwdFib,
  EffHn,
  EffFwd,
  EffUnHn,
  Resume,
  // Extensions: native builtins and the linked exception-frame fast path.
  CallPrim,
  TrapPush,
  TrapPop,
  TrapRaise,
};

inline constexpr std::size_t kRuleCount = static_cast<std::size_t>(Rule::TrapRaise) + 1;

std::string_view rule_name(Rule r);

inline constexpr std::array<Rule, 11> kAdminRules = {Rule::Var,   Rule::Arith1,  Rule::Arith2,  Rule::Arith3,
                                                     Rule::App1,  Rule::App2,    Rule::App3,    Rule::Resume1,
                                                     Rule::Resume2, Rule::Perform, Rule::Raise};
inline constexpr std::array<Rule, 5> kCRules = {Rule::AdminC, Rule::CallC, Rule::Callback, Rule::RetToO,
                                                Rule::ExnFwdO};
inline constexpr std::array<Rule, 13> kORules = {Rule::AdminO, Rule::CallO,   Rule::ExtCall,   Rule::RetToC,
                                                 Rule::RetFib, Rule::Handle,  Rule::ExnHn,     Rule::ExnFwdC,
                                                 Rule::ExnFwdFib, Rule::EffHn, Rule::EffFwd,   Rule::EffUnHn,
                                                 Rule::Resume};

}  // namespace fibervm
