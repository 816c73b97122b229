// SHA-256 content digests for cache keys and run manifests.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lbsoft {

std::string sha256_hex(std::string_view bytes);

// Streaming form; feed raw bytes or doubles (bitwise) and finish once.
class Digest
{
public:
    Digest();
    ~Digest();
    Digest(const Digest&) = delete;
    Digest& operator=(const Digest&) = delete;

    Digest& bytes(std::string_view b);
    Digest& real(double x);
    Digest& reals(const std::vector<double>& xs);
    Digest& integer(long long v);
    std::string hex();

private:
    void* ctx_;
};

} // namespace lbsoft
