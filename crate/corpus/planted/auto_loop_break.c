/* planted: breaking out of the loop leaves list_lock held */
int scan_list(struct node *head)
{
	int found = 0;

	while (head) {
		mutex_lock(&list_lock);
		if (head->bad)
			break;
		found = found + 1;
		mutex_unlock(&list_lock);
		head = head->next;
	}
	return found;
}
