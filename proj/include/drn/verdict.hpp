#pragma once

namespace drn {

enum class Verdict { recurrent, transient, undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::recurrent: return "recurrent";
    case Verdict::transient: return "transient";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

}  // namespace drn
