#include "lbsoft/digest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace lbsoft {

namespace {

EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }

} // namespace

Digest::Digest() : ctx_(EVP_MD_CTX_new())
{
    if (!ctx_ || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: init failed");
}

Digest::~Digest() { EVP_MD_CTX_free(as_ctx(ctx_)); }

Digest& Digest::bytes(std::string_view b)
{
    EVP_DigestUpdate(as_ctx(ctx_), b.data(), b.size());
    return *this;
}

Digest& Digest::real(double x)
{
    unsigned char buf[sizeof(double)];
    std::memcpy(buf, &x, sizeof x);
    EVP_DigestUpdate(as_ctx(ctx_), buf, sizeof buf);
    return *this;
}

Digest& Digest::reals(const std::vector<double>& xs)
{
    integer(static_cast<long long>(xs.size()));
    for (double x : xs)
        real(x);
    return *this;
}

Digest& Digest::integer(long long v)
{
    EVP_DigestUpdate(as_ctx(ctx_), &v, sizeof v);
    return *this;
}

std::string Digest::hex()
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(as_ctx(ctx_), md, &len);
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

std::string sha256_hex(std::string_view bytes)
{
    Digest d;
    d.bytes(bytes);
    return d.hex();
}

} // namespace lbsoft
