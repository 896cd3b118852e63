#include "fibervm/rules.hpp"

namespace fibervm {

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Var: return "Var";
    case Rule::Arith1: return "Arith1";
    case Rule::Arith2: return "Arith2";
    case Rule::Arith3: return "Arith3";
    case Rule::App1: return "App1";
    case Rule::App2: return "App2";
    case Rule::App3: return "App3";
    case Rule::Resume1: return "Resume1";
    case Rule::Resume2: return "Resume2";
    case Rule::Perform: return "Perform";
    case Rule::Raise: return "Raise";
    case Rule::AdminC: return "AdminC";
    case Rule::CallC: return "CallC";
    case Rule::Callback: return "Callback";
    case Rule::RetToO: return "RetToO";
    case Rule::ExnFwdO: return "ExnFwdO";
    case Rule::AdminO: return "AdminO";
    case Rule::CallO: return "CallO";
    case Rule::ExtCall: return "ExtCall";
    case Rule::RetToC: return "RetToC";
    case Rule::RetFib: return "RetFib";
    case Rule::Handle: return "Handle";
    case Rule::ExnHn: return "ExnHn";
    case Rule::ExnFwdC: return "ExnFwdC";
    case Rule::ExnFwdFib: return "ExnFwdFib";
    case Rule::EffHn: return "EffHn";
    case Rule::EffFwd: return "EffFwd";
    case Rule::EffUnHn: return "EffUnHn";
    case Rule::Resume: return "Resume";
    case Rule::CallPrim: return "CallPrim";
    case Rule::TrapPush: return "TrapPush";
    case Rule::TrapPop: return "TrapPop";
    case Rule::TrapRaise: return "TrapRaise";
  }
  return "?";
}

}  // namespace fibervm
