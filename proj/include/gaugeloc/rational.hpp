#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <string>

#include <gaugeloc/errors.hpp>

namespace gaugeloc {

// All arithmetic in this library is exact. Rationals are GMP mpq in canonical
// form (lowest terms, positive denominator); integers are GMP mpz.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline bool rat_is_integer(const Rat& r) { return r.get_den() == 1; }

// Size proxy used for pivot selection: total bit length of numerator and
// denominator. Smaller numbers make better pivots for fraction growth.
inline size_t rat_bits(const Rat& r) {
    return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

// Canonical wire form "p/q" with q >= 1, always including the denominator
// ("3/1", "-5/2", "0/1").
inline std::string rat_to_string(const Rat& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string int_to_string(const Int& z) { return z.get_str(); }

// Parses "p/q" or a bare integer "p". Throws ValidationError on malformed
// input or a zero denominator.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw ValidationError("empty rational literal");
    std::string::size_type slash = s.find('/');
    auto check_int = [&](const std::string& part) {
        if (part.empty()) return false;
        std::string::size_type i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (i == part.size()) return false;
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9') return false;
        return true;
    };
    std::string num = (slash == std::string::npos) ? s : s.substr(0, slash);
    std::string den = (slash == std::string::npos) ? "1" : s.substr(slash + 1);
    if (!check_int(num) || !check_int(den))
        throw ValidationError("malformed rational literal '" + s + "'");
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
        throw ValidationError("malformed rational literal '" + s + "'");
    if (r.get_den() == 0) throw ValidationError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

// floor(p/q) as an integer.
inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

} // namespace gaugeloc
