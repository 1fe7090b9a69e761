/* planted: the cleanup after the return never runs */
int finish(struct job *j)
{
	j->done = 1;
	return 0;
	release(j);
}
