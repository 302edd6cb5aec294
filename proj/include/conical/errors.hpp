#pragma once

#include <stdexcept>
#include <string>

namespace conical {

/* A profiled field was asked about a place its stored data cannot decide. */
struct insufficient_profile : std::runtime_error {
    explicit insufficient_profile(const std::string& m) : std::runtime_error(m) {}
};

/* The operation is not defined for this combination of inputs. */
struct unsupported_operation : std::runtime_error {
    explicit unsupported_operation(const std::string& m) : std::runtime_error(m) {}
};

/* A structural validity problem in a curve model or its group data. */
struct model_error : std::runtime_error {
    explicit model_error(const std::string& m) : std::runtime_error(m) {}
};

/* A bounded search ran out of room; indicates a defect or a bad bound. */
struct search_exhausted : std::runtime_error {
    explicit search_exhausted(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace conical
