int **pp; int *p; int *r; int x; int y;
void f(void) { pp = &p; r = &y; p = &x; *pp = r; }
