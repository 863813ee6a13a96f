#pragma once

#include <string>
#include <string_view>

namespace forumqa::text {

// Porter (1980) suffix-stripping stemmer, following the author's reference C
// implementation (including its "bli" -> "ble" and "logi" -> "log" rules).
// Input is expected lowercase; words of one or two letters pass unchanged.
std::string porter_stem(std::string_view word);

}  // namespace forumqa::text
