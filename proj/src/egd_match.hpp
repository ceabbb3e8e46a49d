#pragma once

#include <functional>
#include <map>
#include <string>

#include "nullq/database.hpp"
#include "nullq/egd.hpp"

namespace nullq::detail {

using Binding = std::map<std::string, Value>;

/// Calls `fn` for each assignment of the body variables of `e` to values
/// of `d` satisfying the body atoms and ψ.  Stops when `fn` returns true;
/// returns whether it stopped.
bool for_each_body_match(const Database& d, const Egd& e,
                         const std::function<bool(const Binding&)>& fn);

}  // namespace nullq::detail
