#pragma once

#include <stdexcept>
#include <string>

namespace fakesat {

/// Base of every error raised by the library. The CLI maps any of these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FAKESAT_DEFINE_ERROR(Name)              \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

FAKESAT_DEFINE_ERROR(DecodeError);
FAKESAT_DEFINE_ERROR(ShapeError);
FAKESAT_DEFINE_ERROR(CodecError);
FAKESAT_DEFINE_ERROR(IoError);
FAKESAT_DEFINE_ERROR(InsufficientData);
FAKESAT_DEFINE_ERROR(DegenerateInput);
FAKESAT_DEFINE_ERROR(SingleClassError);
FAKESAT_DEFINE_ERROR(ConfigMismatch);
FAKESAT_DEFINE_ERROR(IndexError);
FAKESAT_DEFINE_ERROR(EmptyReport);
FAKESAT_DEFINE_ERROR(MissingChannel);
FAKESAT_DEFINE_ERROR(FormatError);
FAKESAT_DEFINE_ERROR(ConfigError);

#undef FAKESAT_DEFINE_ERROR

} // namespace fakesat
