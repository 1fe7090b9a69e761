/* p = q merges pointees under unification only */
int *p; int *q; int x; int y;
void f(void) { p = &x; q = &y; p = q; }
