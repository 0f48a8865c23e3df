#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ifagent.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      const char *e = ifa_last_error();                               \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, e ? e : ""); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  IfaSession *s = NULL;
  CHECK(ifa_session_open("closet", NULL, &s) == IFA_STATUS_OK);

  IfaPercept p;
  CHECK(ifa_session_step(s, "take gun", &p) == IFA_STATUS_OK);
  CHECK(p.score == 10);
  ifa_string_free(p.description);
  CHECK(ifa_session_step(s, "east", &p) == IFA_STATUS_OK);
  CHECK(p.won);
  ifa_string_free(p.description);

  IfaEpisode ep;
  CHECK(ifa_session_run(s, 100, 3, &ep) == IFA_STATUS_OK);
  CHECK(ep.final_score == 15 && ep.max_score == 15);
  CHECK(fabs(ep.modified_score - 1.2) < 1e-12);

  char *t = NULL;
  CHECK(ifa_session_transcript(s, &t) == IFA_STATUS_OK && t != NULL);
  CHECK(strstr(t, "take gun") != NULL);
  ifa_string_free(t);

  double m = 0;
  CHECK(ifa_modified_score(1, 0, &m) == IFA_STATUS_USAGE);
  CHECK(ifa_last_error() != NULL);

  ifa_session_free(s);
  printf("ok %s\n", ifa_version());
  return 0;
}
