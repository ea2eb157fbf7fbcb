#include "lowspace/gf2k.hpp"

#include <vector>

#include "lowspace/error.hpp"

namespace lowspace {

namespace {

std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, unsigned k, std::uint32_t modulus) {
    std::uint32_t r = 0;
    const std::uint32_t top = std::uint32_t{1} << k;
    while (b) {
        if (b & 1u)
            r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top)
            a ^= modulus;
    }
    return r;
}

std::uint32_t pow_mod(std::uint32_t a, std::uint64_t e, unsigned k, std::uint32_t modulus) {
    std::uint32_t r = 1;
    while (e) {
        if (e & 1u)
            r = mul_mod(r, a, k, modulus);
        a = mul_mod(a, a, k, modulus);
        e >>= 1;
    }
    return r;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t p = 2; p * p <= n; ++p) {
        if (n % p)
            continue;
        out.push_back(p);
        while (n % p == 0)
            n /= p;
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

} // namespace

GF2k::GF2k(unsigned k) : k_(k), modulus_(0) {
    if (k < 1 || k > 16)
        throw ParamError("field degree must be in [1, 16]");
    const std::uint32_t n = (std::uint32_t{1} << k) - 1;
    const auto factors = prime_factors(n);
    for (std::uint32_t low = 1; low < (std::uint32_t{1} << k); low += 2) {
        const std::uint32_t poly = (std::uint32_t{1} << k) | low;
        if (k == 1) {
            modulus_ = poly;
            break;
        }
        if (pow_mod(2, n, k, poly) != 1)
            continue;
        bool primitive = true;
        for (auto q : factors)
            if (pow_mod(2, n / q, k, poly) == 1)
                primitive = false;
        if (primitive) {
            modulus_ = poly;
            break;
        }
    }
    if (modulus_ == 0)
        throw Error("no primitive polynomial of degree " + std::to_string(k));
}

std::uint32_t GF2k::mul(std::uint32_t a, std::uint32_t b) const {
    if (k_ == 1)
        return a & b;
    return mul_mod(a, b, k_, modulus_);
}

std::uint32_t GF2k::pow(std::uint32_t a, std::uint64_t e) const {
    if (k_ == 1)
        return e == 0 ? 1 : a;
    return pow_mod(a, e, k_, modulus_);
}

std::uint32_t GF2k::root_of_unity(std::uint32_t m) const {
    if (m == 0 || order() % m)
        throw ParamError("GF(2^" + std::to_string(k_) + ") has no primitive " + std::to_string(m) + "-th root of unity");
    if (k_ == 1)
        return 1;
    return pow(generator(), order() / m);
}

unsigned order_of_two(std::uint32_t m) {
    if (m < 3 || m % 2 == 0)
        throw ParamError("order of 2 needs an odd modulus > 1");
    unsigned k = 1;
    std::uint64_t x = 2 % m;
    while (x != 1) {
        x = x * 2 % m;
        ++k;
    }
    return k;
}

RootGrid choose_root_grid(std::size_t deg) {
    for (std::uint32_t m = static_cast<std::uint32_t>(deg + 1) | 1u;; m += 2) {
        if (m < 3)
            continue;
        const unsigned k = order_of_two(m);
        if (k <= 16)
            return {m, k};
    }
}

} // namespace lowspace
