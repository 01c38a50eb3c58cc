// Acceptance run: one PASS/FAIL line per criterion, INFO lines alongside.
// Exit status 0 only if every gating check passes.
//
//   fsorf_acceptance [mc_samples]     default 1e7 per grid point

#include <cstdio>
#include <cstdlib>

#include "fsorf/fsorf.h"

namespace {

void print(const fsorf_check*, const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  fsorf_validate_options o;
  fsorf_validate_options_init(&o);
  if (argc > 1) o.mc_samples = std::atoll(argv[1]);
  o.on_check = print;
  std::printf("acceptance: %lld Monte-Carlo samples per grid point, %lld per KS test, %d threads\n",
              o.mc_samples, o.ks_samples, fsorf_default_threads());
  fsorf_report* rep = nullptr;
  if (fsorf_validate(&o, &rep) != FSORF_OK) {
    std::fprintf(stderr, "acceptance: %s\n", fsorf_last_error());
    return 1;
  }
  int failed = 0;
  for (size_t i = 0; i < fsorf_report_count(rep); ++i) {
    fsorf_check c;
    fsorf_report_check(rep, i, &c);
    if (!c.informational && !c.passed) ++failed;
  }
  std::printf("acceptance: %d gating check(s) failed\n", failed);
  fsorf_report_free(rep);
  return failed ? 1 : 0;
}
