/* the stray semicolon makes the return unconditional */
int check_flag(int cond)
{
	if (cond);
		return 1;
	return 0;
}
