#pragma once
#include <stdexcept>
#include <string>

namespace rtheta {

/// A planner or solver could not satisfy its constraints.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rtheta
