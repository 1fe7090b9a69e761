int **pp; int *p; int *q; int x; int y;
void f(void) { p = &x; q = &y; pp = &p; q = *pp; }
