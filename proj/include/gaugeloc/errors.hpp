#pragma once

#include <stdexcept>
#include <string>

namespace gaugeloc {

// Base class for every refusal the library can issue. Refusing loudly is a
// design rule here: no operation silently truncates or approximates.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- exact-linalg ---------------------------------------------------------
struct NotASubspace : Error {
    explicit NotASubspace(const std::string& w) : Error("NotASubspace: " + w) {}
};
struct NotInSpan : Error {
    explicit NotInSpan(const std::string& w) : Error("NotInSpan: " + w) {}
};
struct TorsionDetected : Error {
    explicit TorsionDetected(const std::string& w) : Error("TorsionDetected: " + w) {}
};

// --- complex --------------------------------------------------------------
struct BadSpec : Error {
    explicit BadSpec(const std::string& w) : Error("BadSpec: " + w) {}
};
struct DegreeMismatch : Error {
    explicit DegreeMismatch(const std::string& w) : Error("DegreeMismatch: " + w) {}
};
struct ComplexMismatch : Error {
    explicit ComplexMismatch(const std::string& w) : Error("ComplexMismatch: " + w) {}
};
struct SupportLeak : Error {
    explicit SupportLeak(const std::string& w) : Error("SupportLeak: " + w) {}
};

// --- cohomology toolkit ---------------------------------------------------
struct BadProfile : Error {
    explicit BadProfile(const std::string& w) : Error("BadProfile: " + w) {}
};

// --- propagator -----------------------------------------------------------
struct NonHyperbolic : Error {
    explicit NonHyperbolic(const std::string& w) : Error("NonHyperbolic: " + w) {}
};
struct MarginViolation : Error {
    explicit MarginViolation(const std::string& w) : Error("MarginViolation: " + w) {}
};
struct ShadowOverflow : Error {
    explicit ShadowOverflow(const std::string& w) : Error("ShadowOverflow: " + w) {}
};

// --- maxwell --------------------------------------------------------------
struct ShadowsIntersect : Error {
    explicit ShadowsIntersect(const std::string& w) : Error("ShadowsIntersect: " + w) {}
};
struct WindowTooThin : Error {
    explicit WindowTooThin(const std::string& w) : Error("WindowTooThin: " + w) {}
};

// --- ccr ------------------------------------------------------------------
struct GroupMismatch : Error {
    explicit GroupMismatch(const std::string& w) : Error("GroupMismatch: " + w) {}
};
struct NotPresymplectic : Error {
    explicit NotPresymplectic(const std::string& w) : Error("NotPresymplectic: " + w) {}
};

// --- cli ------------------------------------------------------------------
struct ParseError : Error {
    int line;
    int column;
    ParseError(int line_, int col_, const std::string& w)
        : Error("ParseError at " + std::to_string(line_) + ":" + std::to_string(col_) +
                ": " + w),
          line(line_), column(col_) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error("ValidationError: " + w) {}
};

} // namespace gaugeloc
