struct s { int *f; int *g; };
struct s s1; struct s s2; int x; int y; int *p;
void f(void) { s1.f = &x; s2.g = &y; p = s1.g; }
