// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_TERN_HPP
#define QCOMPAT_TERN_HPP

namespace qcompat {

// Three-valued verdict: undecided is surfaced, never coerced to No.
enum class Tern { Yes, No, Undecided };

inline const char* to_string(Tern t) {
  switch (t) {
    case Tern::Yes: return "yes";
    case Tern::No: return "no";
    case Tern::Undecided: return "undecided";
  }
  return "undecided";
}

}  // namespace qcompat

#endif
