#pragma once

#include <stdexcept>
#include <string>

namespace mixlap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : Error {
    using Error::Error;
};

struct MeshError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

} // namespace mixlap
