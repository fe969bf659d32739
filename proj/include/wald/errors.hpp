#pragma once

#include <stdexcept>
#include <string>

namespace wald {

// Base class for every domain error in the library. Callers that only care
// about "was the input valid" can catch this one type.
struct WaldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// forest_core

struct IncompatibleSplits : WaldError {
    std::string e1, e2;
    IncompatibleSplits(std::string a, std::string b)
        : WaldError("incompatible splits " + a + " and " + b),
          e1(std::move(a)), e2(std::move(b)) {}
};

struct SeparationViolated : WaldError {
    int u, v;
    SeparationViolated(int u_, int v_)
        : WaldError("no split separates leaves " + std::to_string(u_) + " and " +
                    std::to_string(v_) + " inside their block"),
          u(u_), v(v_) {}
};

struct OverlappingBlocks : WaldError {
    std::string e1, e2;
    OverlappingBlocks(std::string a, std::string b)
        : WaldError("splits " + a + " and " + b +
                    " have partially overlapping supports"),
          e1(std::move(a)), e2(std::move(b)) {}
};

struct NotInWaldSpace : WaldError {
    using WaldError::WaldError;
};

// newick_io

struct SyntaxError : WaldError {
    std::size_t position;
    SyntaxError(std::size_t pos, const std::string& what)
        : WaldError("syntax error at position " + std::to_string(pos) + ": " + what),
          position(pos) {}
};

struct DuplicateLabel : WaldError {
    int label;
    explicit DuplicateLabel(int u)
        : WaldError("duplicate leaf label " + std::to_string(u)), label(u) {}
};

struct MissingLength : WaldError {
    std::string edge;
    explicit MissingLength(std::string e)
        : WaldError("edge " + e + " has no branch length"), edge(std::move(e)) {}
};

struct NonPositiveLength : WaldError {
    std::string edge;
    explicit NonPositiveLength(std::string e)
        : WaldError("edge " + e + " has a nonpositive branch length"),
          edge(std::move(e)) {}
};

struct DegreeTwoVertex : WaldError {
    int id;
    explicit DegreeTwoVertex(int vertex)
        : WaldError("unlabeled vertex " + std::to_string(vertex) +
                    " has degree below three"),
          id(vertex) {}
};

struct DomainError : WaldError {
    using WaldError::WaldError;
};

// spd

struct EigenFailure : WaldError {
    using WaldError::WaldError;
};

struct NotPositiveDefinite : WaldError {
    using WaldError::WaldError;
};

// embedding

struct UnknownSplit : WaldError {
    using WaldError::WaldError;
};

struct NotAWaldMatrix : WaldError {
    using WaldError::WaldError;
};

struct PreconditionViolated : WaldError {
    using WaldError::WaldError;
};

// geometry / stats

struct SingularMetric : WaldError {
    using WaldError::WaldError;
};

struct DegeneratePlane : WaldError {
    using WaldError::WaldError;
};

struct DegenerateTriangle : WaldError {
    using WaldError::WaldError;
};

struct TopologyMismatch : WaldError {
    using WaldError::WaldError;
};

}  // namespace wald
