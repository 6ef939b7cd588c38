// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_HASH_HPP
#define COVENANT_HASH_HPP

#include <covenant/common.hpp>

namespace covenant {

Hash256 sha256(ByteView data);
/** SHA256(SHA256(data)) */
Hash256 double_sha256(ByteView data);
Hash256 hmac_sha256(ByteView key, ByteView data);

inline Hash256 sha256(std::string_view text)
{
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace covenant

#endif // COVENANT_HASH_HPP
