#pragma once

#include <stdexcept>
#include <string>

namespace cornerq {

/// Base class for every domain error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CORNERQ_DEFINE_ERROR(name, base)                      \
    class name : public base {                                \
    public:                                                   \
        explicit name(const std::string& what) : base(what) {} \
    }

CORNERQ_DEFINE_ERROR(invalid_point, error);
CORNERQ_DEFINE_ERROR(out_of_radius, error);
CORNERQ_DEFINE_ERROR(invalid_germ, error);
CORNERQ_DEFINE_ERROR(not_invertible, error);
CORNERQ_DEFINE_ERROR(no_support, error);
CORNERQ_DEFINE_ERROR(undecidable_angle, error);
CORNERQ_DEFINE_ERROR(resonance_undeclared, undecidable_angle);
CORNERQ_DEFINE_ERROR(pole_coincidence, error);
CORNERQ_DEFINE_ERROR(not_normalized, error);
CORNERQ_DEFINE_ERROR(outside_extension, error);
CORNERQ_DEFINE_ERROR(insufficient_steps, error);
CORNERQ_DEFINE_ERROR(window_empty, error);
CORNERQ_DEFINE_ERROR(schema_error, error);
CORNERQ_DEFINE_ERROR(scenario_error, error);

#undef CORNERQ_DEFINE_ERROR

} // namespace cornerq
