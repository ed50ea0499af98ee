#pragma once

#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace skit {

/// Base rings supported by the library: Z, Z/n (n >= 2), F_p (p prime).
/// The involution is the identity throughout.
enum class RingKind { Integers, IntegersModN, PrimeField };

struct BaseRing {
    RingKind kind = RingKind::Integers;
    mpz_class modulus = 0;  // n or p; 0 for Z

    static BaseRing Z() { return BaseRing{RingKind::Integers, 0}; }

    static BaseRing Zmod(const mpz_class& n) {
        if (n < 2) throw std::invalid_argument("Zmod: modulus must be >= 2");
        return BaseRing{RingKind::IntegersModN, n};
    }

    static BaseRing Fp(const mpz_class& p) {
        if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0)
            throw std::invalid_argument("Fp: p must be prime");
        return BaseRing{RingKind::PrimeField, p};
    }

    bool is_integers() const { return kind == RingKind::Integers; }
    bool is_modular() const { return kind != RingKind::Integers; }

    /// Canonical representative of x in the ring (x itself over Z, x mod n in [0,n)).
    mpz_class reduce(const mpz_class& x) const {
        if (!is_modular()) return x;
        mpz_class r = x % modulus;
        if (r < 0) r += modulus;
        return r;
    }

    bool operator==(const BaseRing& o) const { return kind == o.kind && modulus == o.modulus; }
    bool operator!=(const BaseRing& o) const { return !(*this == o); }

    std::string str() const {
        switch (kind) {
            case RingKind::Integers: return "Z";
            case RingKind::IntegersModN: return "Z/" + modulus.get_str();
            case RingKind::PrimeField: return "F_" + modulus.get_str();
        }
        return "?";
    }
};

/// Sign of a quadratic/symmetric structure; eps^2 = 1.
struct Epsilon {
    int value = 1;  // +1 or -1

    Epsilon() = default;
    explicit Epsilon(int v) : value(v) {
        if (v != 1 && v != -1) throw std::invalid_argument("Epsilon must be +-1");
    }
    Epsilon operator-() const { return Epsilon(-value); }
    bool operator==(const Epsilon& o) const { return value == o.value; }
    bool operator!=(const Epsilon& o) const { return value != o.value; }
};

inline const Epsilon EPS_PLUS{1};
inline const Epsilon EPS_MINUS{-1};

}  // namespace skit
