int ***ppp; int **pp; int *p; int x; int *q;
void f(void) { p = &x; pp = &p; ppp = &pp; q = **ppp; }
