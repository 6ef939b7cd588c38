// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/hash.hpp>

#include <openssl/evp.h>
#include <openssl/hmac.h>

namespace covenant {

Hash256 sha256(ByteView data)
{
    Hash256 out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
        throw std::runtime_error("EVP_Digest(sha256) failed");
    }
    return out;
}

Hash256 double_sha256(ByteView data)
{
    return sha256(sha256(data).view());
}

Hash256 hmac_sha256(ByteView key, ByteView data)
{
    Hash256 out;
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.bytes.data(), &len) || len != 32) {
        throw std::runtime_error("HMAC-SHA256 failed");
    }
    return out;
}

} // namespace covenant
